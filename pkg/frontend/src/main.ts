import { ApiClient } from "./api.js";
import { mountApp } from "./app.js";

const app = mountApp(document.getElementById("app")!, new ApiClient("/api/v1"));
void app.init().then(() => app.poller.start());
