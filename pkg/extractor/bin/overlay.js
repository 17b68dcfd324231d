#!/usr/bin/env node
const { main } = require("../dist/cli");
process.exit(main("overlay", process.argv.slice(2)));
