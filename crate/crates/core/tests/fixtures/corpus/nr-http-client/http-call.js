const http = require("http");
const https = require("https");

module.exports = function (RED) {
    function HttpCall(config) {
        RED.nodes.createNode(this, config);
        const node = this;

        node.on("input", function (msg) {
            const options = { host: msg.host || config.host, path: config.path, method: "POST" };
            const req = http.request(options, function () {});
            req.write(JSON.stringify(msg.payload));
            req.end();
            https.request(msg.secureUrl).end();
            http.get(msg.url);
        });

        http.get(config.statusUrl, function (res) {
            node.send({ payload: res.statusCode });
        });
    }
    RED.nodes.registerType("http-call", HttpCall);
};
