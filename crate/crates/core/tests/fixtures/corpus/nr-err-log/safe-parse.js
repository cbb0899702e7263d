module.exports = function (RED) {
    function SafeParse(config) {
        RED.nodes.createNode(this, config);
        var node = this;
        var defaults = {};
        try {
            defaults = JSON.parse(config.defaults);
        } catch (ex) {
            RED.log.warn("safe-parse: bad defaults: " + ex.message);
        }
    }
    RED.nodes.registerType("safe-parse", SafeParse);
};
