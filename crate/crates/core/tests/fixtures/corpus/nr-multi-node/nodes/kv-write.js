module.exports = function (RED) {
    function KvWrite(config) {
        RED.nodes.createNode(this, config);
        var node = this;
        node.on("input", function (msg) {
            node.context().global.set(config.key, msg.payload);
        });
    }
    RED.nodes.registerType("kv-write", KvWrite);
};
