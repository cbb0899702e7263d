const os = require("os");

module.exports = function (RED) {
    function HostInfo(config) {
        RED.nodes.createNode(this, config);
        const node = this;
        const host = os.hostname();
        console.log("host-info running on " + host);
    }
    RED.nodes.registerType("host-info", HostInfo);
};
