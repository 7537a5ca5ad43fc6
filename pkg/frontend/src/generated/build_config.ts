// Written by scripts/gen-config.mjs at build time from FIRETWIN_API_BASE.
export const BUILD_API_BASE = "";
