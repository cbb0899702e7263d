module.exports = function (RED) {
    function EnvStatus(config) {
        RED.nodes.createNode(this, config);
        const node = this;
        const home = process.env.NODE_HOME || "/";
        node.status({ fill: "green", shape: "dot", text: home });
    }
    RED.nodes.registerType("env-status", EnvStatus);
};
