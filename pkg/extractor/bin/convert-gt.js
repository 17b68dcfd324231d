#!/usr/bin/env node
const { main } = require("../dist/cli");
process.exit(main("convert-gt", process.argv.slice(2)));
