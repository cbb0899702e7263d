module.exports = function (RED) {
    function CloudKey(config) {
        RED.nodes.createNode(this, config);
        this.name = config.name;
    }
    RED.nodes.registerType("cloud-key", CloudKey, {
        credentials: { token: { type: "password" } }
    });
};
