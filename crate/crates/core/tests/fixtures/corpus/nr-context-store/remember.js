module.exports = function (RED) {
    function Remember(config) {
        RED.nodes.createNode(this, config);
        var node = this;
        var root = RED.settings.httpNodeRoot;

        node.on("input", function (msg) {
            node.context().set("last", msg.payload);
            flow.set("lastTopic", msg.topic);
            global.set("lastSeen", msg);
            var previous = node.context().flow.get("previous");
            node.send({ payload: previous, root: root });
        });
    }
    RED.nodes.registerType("remember", Remember);
};
