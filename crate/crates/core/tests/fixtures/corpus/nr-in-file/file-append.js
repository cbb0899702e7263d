const fs = require("fs");

module.exports = function (RED) {
    function FileAppend(config) {
        RED.nodes.createNode(this, config);
        const node = this;
        node.on("input", function (msg, send, done) {
            const line = String(msg.payload) + "\n";
            fs.appendFile(config.filename, line, function () {
                done();
            });
        });
    }
    RED.nodes.registerType("file-append", FileAppend);
};
