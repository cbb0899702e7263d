const request = require("request");
const net = require("net");
const WebSocket = require("ws");

module.exports = function (RED) {
    function NetPush(config) {
        RED.nodes.createNode(this, config);
        const node = this;
        const sock = net.connect(config.port, config.host);
        const ws = new WebSocket(config.wsUrl);

        node.on("input", function (msg) {
            const body = JSON.stringify(msg.payload);
            request({ url: config.url, method: "POST", body: body });
            fetch(config.url, { method: "PUT", body });
            sock.write(body);
            ws.send(body);
        });
    }
    RED.nodes.registerType("net-push", NetPush);
};
