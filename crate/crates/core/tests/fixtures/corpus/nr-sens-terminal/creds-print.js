module.exports = function (RED) {
    function CredsPrint(config) {
        RED.nodes.createNode(this, config);
        var node = this;
        var user = node.credentials.username;
        node.on("close", function () {
            console.log("closing connection for " + user);
        });
    }
    RED.nodes.registerType("creds-print", CredsPrint, {
        credentials: { username: { type: "text" } }
    });
};
