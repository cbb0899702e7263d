module.exports = function (RED) {
    function Inspect(config) {
        RED.nodes.createNode(this, config);
        var node = this;
        node.on("input", function (msg) {
            var shown = config.property ? msg[config.property] : msg.payload;
            node.warn(shown);
        });
    }
    RED.nodes.registerType("inspect", Inspect);
};
