const Gpio = require("onoff").Gpio;

module.exports = function (RED) {
    function Led(config) {
        RED.nodes.createNode(this, config);
        const node = this;
        const pin = new Gpio(parseInt(config.pin, 10), "out");
        node.on("input", function (msg) {
            const level = msg.payload ? 1 : 0;
            pin.writeSync(level);
        });
        node.on("close", function () {
            pin.unexport();
        });
    }
    RED.nodes.registerType("led", Led);
};
