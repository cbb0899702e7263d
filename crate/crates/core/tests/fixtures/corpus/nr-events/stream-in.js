var fs = require("fs");
var net = require("net");
var mqtt = require("mqtt");

module.exports = function (RED) {
    function StreamIn(config) {
        RED.nodes.createNode(this, config);
        var node = this;
        var greeting = fs.readFileSync(config.greetingFile, "utf8");
        var server = net.createServer(function (socket) {
            socket.on("data", function (chunk) {
                node.send({ payload: chunk.toString() });
            });
        });
        server.listen(config.port);

        var client = mqtt.connect(config.broker);
        client.on("message", function (topic, message) {
            node.send({ topic: topic, payload: message, greeting: greeting });
        });
    }
    RED.nodes.registerType("stream-in", StreamIn);
};
