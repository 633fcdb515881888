import { ApiClient } from "./api.js";
import { App } from "./app.js";
import { showToast } from "./controls.js";

function bootstrap(): void {
  const shelf = document.getElementById("shelf");
  const sortPanel = document.getElementById("sort-panel");
  const encodingMenu = document.getElementById("encoding-menu");
  const detailPanel = document.getElementById("detail-panel");
  const uploadInput = document.getElementById("upload-input") as HTMLInputElement | null;
  const uploadStatus = document.getElementById("upload-status");
  if (!shelf || !sortPanel || !encodingMenu || !detailPanel || !uploadInput) {
    throw new Error("missing page skeleton");
  }

  const app = new App({ shelf, sortPanel, encodingMenu, detailPanel }, new ApiClient());

  uploadInput.addEventListener("change", async () => {
    const file = uploadInput.files?.[0];
    if (!file) return;
    try {
      const result = await app.upload(file, file.name);
      if (uploadStatus) {
        const report = result.ingest_report;
        uploadStatus.textContent =
          `${report.accepted} accepted, ${report.rejected.length} rejected, ` +
          `${report.deduplicated} duplicates`;
      }
    } catch {
      showToast("upload failed");
    }
  });
}

bootstrap();
