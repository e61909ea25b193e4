import { mountApp } from "./app.js";

const root = document.getElementById("app");
if (root) {
  const base = new URLSearchParams(window.location.search).get("api") ?? "http://127.0.0.1:8642";
  mountApp(root, base);
}
