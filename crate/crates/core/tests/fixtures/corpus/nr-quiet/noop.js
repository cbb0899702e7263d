module.exports = function (RED) {
    function Noop(config) {
        RED.nodes.createNode(this, config);
        this.count = 0;
    }
    RED.nodes.registerType("noop", Noop);
};
