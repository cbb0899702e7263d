module.exports = function (RED) {
    function KvRead(config) {
        RED.nodes.createNode(this, config);
        var node = this;
        node.on("input", function (msg) {
            msg.payload = node.context().global.get(config.key);
            node.send(msg);
        });
    }
    RED.nodes.registerType("kv-read", KvRead);
};
