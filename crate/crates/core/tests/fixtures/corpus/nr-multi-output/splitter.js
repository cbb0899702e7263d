module.exports = function (RED) {
    function Splitter(config) {
        RED.nodes.createNode(this, config);
        var node = this;
        node.on("input", function (msg) {
            node.debug("splitting " + msg._msgid);
            var parts = String(msg.payload).split(config.separator || ",");
            node.trace("parts: " + parts.length);
            RED.comms.publish("splitter/" + node.id, { count: parts.length });
            node.send([{ payload: parts[0] }, { payload: parts.slice(1) }]);
        });
    }
    RED.nodes.registerType("splitter", Splitter);
};
