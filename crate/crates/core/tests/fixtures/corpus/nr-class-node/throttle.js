module.exports = function (RED) {
    class Throttle {
        constructor(config) {
            RED.nodes.createNode(this, config);
            this.limit = Number(config.limit) || 1;
            this.on("input", (msg, send, done) => this.handle(msg, send, done));
        }

        handle(msg, send, done) {
            if (this.limit > 0) {
                this.limit -= 1;
                send(msg);
            } else {
                this.status({ fill: "red", text: "dropped " + msg._msgid });
            }
            done();
        }
    }
    RED.nodes.registerType("throttle", Throttle);
};
