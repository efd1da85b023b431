import { ApiClient } from './api.js';
import { App } from './app.js';

const app = new App(document, new ApiClient(''));
document.addEventListener('DOMContentLoaded', () => {
  void app.init().catch((err) => {
    const box = document.querySelector('#error-box') as HTMLElement | null;
    if (box) {
      box.hidden = false;
      box.textContent = `failed to reach the service: ${err}`;
    }
  });
});

export { app };
