const axios = require("axios");

module.exports = function (RED) {
    function ApiPush(config) {
        RED.nodes.createNode(this, config);
        const node = this;
        const apiKey = config.key;

        function register() {
            return axios.post(config.url + "/register", { key: apiKey });
        }
        register();
    }
    RED.nodes.registerType("api-push", ApiPush);
};
