/** Entry point: wire the API client to the dashboard.
 *
 * The API base URL is the only configuration; it comes from the `?api=`
 * query parameter or defaults to the serving origin.
 */

import { ApiClient } from "./api.js";
import { Dashboard } from "./dashboard.js";

const params = new URLSearchParams(window.location.search);
const baseUrl = params.get("api") ?? "";

const root = document.getElementById("app");
if (!root) {
  throw new Error("missing #app mount point");
}

const dashboard = new Dashboard(new ApiClient(baseUrl), root);
void dashboard.start().catch((error: unknown) => {
  root.textContent = `failed to load: ${error instanceof Error ? error.message : String(error)}`;
});
