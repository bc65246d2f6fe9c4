import { initApp } from "./app.js";
import { buildSkeleton } from "./dom.js";

const root = document.getElementById("app");
if (root === null) {
    throw new Error("missing #app mount point");
}
const app = initApp(buildSkeleton(root), "");
void app.loadThresholds();
