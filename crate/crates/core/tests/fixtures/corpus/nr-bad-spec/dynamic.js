module.exports = function (RED) {
    function Dynamic(config) {
        RED.nodes.createNode(this, config);
        var node = this;
        node.on("input", function (msg) {
            node.send(msg);
        });
    }
    RED.nodes.registerType("dynamic", Dynamic);
};
