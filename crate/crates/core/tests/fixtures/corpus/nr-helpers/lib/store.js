const fs = require("fs");

exports.save = function (record) {
    fs.writeFileSync("/tmp/store.json", JSON.stringify(record));
};
