const fs = require("fs");

module.exports = function (RED) {
    function FileWatch(config) {
        RED.nodes.createNode(this, config);
        const node = this;
        fs.stat(config.filename, function (err, stats) {
            if (err) {
                node.error("cannot watch: " + err);
                return;
            }
        });
    }
    RED.nodes.registerType("file-watch", FileWatch);
};
