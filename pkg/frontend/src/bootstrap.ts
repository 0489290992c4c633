/**
 * Browser entry point. Kept apart from boot() so tests can import the app
 * without a DOMContentLoaded side effect firing.
 */

import { ApiClient } from "./api.js";
import { boot } from "./main.js";

function start(): void {
  const root = document.getElementById("app");
  if (root === null) {
    return;
  }
  // Point at another service with ?api=http://host:port (must be in the
  // service's CORS allow list); default is same-origin.
  const params = new URLSearchParams(window.location.search);
  const api = new ApiClient({ baseUrl: params.get("api") ?? "" });
  boot(root, { api });
}

if (document.readyState === "loading") {
  document.addEventListener("DOMContentLoaded", start);
} else {
  start();
}
