const mqtt = require("mqtt");

module.exports = function (RED) {
    function MqttOut(config) {
        RED.nodes.createNode(this, config);
        const node = this;
        const client = mqtt.connect(config.broker);
        node.on("input", function (msg) {
            const topic = config.topic || "default";
            client.publish(topic, JSON.stringify(msg.payload));
        });
        node.on("close", function () {
            client.end();
        });
    }
    RED.nodes.registerType("mqtt-out", MqttOut);
};
