var SerialPort = require("serialport");
var Gpio = require("onoff").Gpio;
var rpio = require("rpio");

module.exports = function (RED) {
    function SerialGpio(config) {
        RED.nodes.createNode(this, config);
        var node = this;
        var port = new SerialPort(config.device, { baudRate: 9600 });
        var relay = new Gpio(config.pin, "out");

        node.on("input", function (msg) {
            port.write(msg.payload);
            relay.write(msg.state, function () {});
            rpio.write(config.rpioPin, msg.level);
        });
    }
    RED.nodes.registerType("serial-gpio", SerialGpio);
};
