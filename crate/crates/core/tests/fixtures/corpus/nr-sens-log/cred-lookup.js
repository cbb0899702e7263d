module.exports = function (RED) {
    function CredLookup(config) {
        RED.nodes.createNode(this, config);
        var node = this;
        var creds = RED.nodes.getCredentials(config.server);
        if (!creds) {
            return;
        }
        node.log("using account " + creds.user);
    }
    RED.nodes.registerType("cred-lookup", CredLookup);
};
