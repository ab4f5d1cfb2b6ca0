import { ApiClient } from "./api.js";
import { QueueController } from "./controller.js";
import { render } from "./render.js";

const root = document.querySelector<HTMLElement>("#app");
if (!root) {
  throw new Error("missing #app mount point");
}

const controller = new QueueController(new ApiClient(""));
controller.subscribe((state) => render(root, controller, state));
void controller.load();
