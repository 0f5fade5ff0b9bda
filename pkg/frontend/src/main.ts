import { SessionApi } from "./api.js";
import { ChatApp } from "./app.js";

const root = document.getElementById("app");
if (root === null) {
  throw new Error("missing #app mount point");
}
const app = new ChatApp(root, new SessionApi(""));
void app.start();
