const net = require("net");

module.exports = function (RED) {
    function TcpProbe(config) {
        RED.nodes.createNode(this, config);
        const node = this;
        const socket = net.connect(config.port, config.host);
        socket.on("error", function (problem) {
            console.error("probe failed", problem);
        });
        node.on("close", function () {
            socket.destroy();
        });
    }
    RED.nodes.registerType("tcp-probe", TcpProbe);
};
