import { App } from "./app.js";

const app = new App(document);
void app.init().catch((error) => {
  const banner = document.querySelector("#error-banner") as HTMLElement;
  const text = document.querySelector("#error-text") as HTMLElement;
  if (banner && text) {
    banner.hidden = false;
    text.textContent = `cannot reach the codesign service: ${error}`;
  }
});
