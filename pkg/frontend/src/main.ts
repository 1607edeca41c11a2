import { startApp } from "./app.js";

const root = document.getElementById("app");
if (root) {
  const apiBase = (window as unknown as { G2G_API_BASE?: string }).G2G_API_BASE ?? "http://127.0.0.1:8800";
  startApp(root, { apiBase });
}
