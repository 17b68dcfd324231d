#!/usr/bin/env node
const { main } = require("../dist/cli");
process.exit(main("extract-templates", process.argv.slice(2)));
