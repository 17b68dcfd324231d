#!/usr/bin/env node
const { main } = require("../dist/cli");
process.exit(main("extract-proposals", process.argv.slice(2)));
