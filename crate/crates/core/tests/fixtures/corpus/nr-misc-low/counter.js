module.exports = function (RED) {
    function Counter(config) {
        RED.nodes.createNode(this, config);
        var node = this;
        var count = node.context().get("count") || 0;
        var timer = setInterval(function () {
            node.send({ payload: count });
        }, 1000);
        node.on("close", function () {
            clearInterval(timer);
        });
    }
    RED.nodes.registerType("counter", Counter);
};
