import "./styles.css";
import { Api } from "./api";
import { renderAnnotate } from "./annotate";
import { renderDashboard } from "./dashboard";
import { UiSession } from "./session";

export function bootstrap(root: HTMLElement, api: Api = new Api()): void {
  root.innerHTML = `
    <header>
      <h1>quizforge review</h1>
      <nav>
        <button id="tab-annotate" class="tab active">Annotate</button>
        <button id="tab-dashboard" class="tab">Dashboard</button>
      </nav>
    </header>
    <form id="identity">
      <label>Rater id <input id="rater-id" required placeholder="your-name"></label>
      <label>Role
        <select id="rater-role">
          <option value="student">student</option>
          <option value="instructor">instructor</option>
        </select>
      </label>
      <button type="submit">Start rating</button>
    </form>
    <main id="view"></main>
  `;

  const view = root.querySelector<HTMLElement>("#view")!;
  const identity = root.querySelector<HTMLFormElement>("#identity")!;
  const annotateTab = root.querySelector<HTMLButtonElement>("#tab-annotate")!;
  const dashboardTab = root.querySelector<HTMLButtonElement>("#tab-dashboard")!;
  let session: UiSession | null = null;

  const showAnnotate = () => {
    annotateTab.classList.add("active");
    dashboardTab.classList.remove("active");
    if (session) {
      renderAnnotate(session, view);
    } else {
      view.innerHTML = "<p class='placeholder'>Enter a rater id to start.</p>";
    }
  };

  identity.addEventListener("submit", async (event) => {
    event.preventDefault();
    const raterId = root.querySelector<HTMLInputElement>("#rater-id")!.value.trim();
    const raterRole = root.querySelector<HTMLSelectElement>("#rater-role")!.value;
    if (!raterId) return;
    session = new UiSession(api, raterId, raterRole);
    await session.loadNext();
    showAnnotate();
  });

  annotateTab.addEventListener("click", showAnnotate);
  dashboardTab.addEventListener("click", () => {
    dashboardTab.classList.add("active");
    annotateTab.classList.remove("active");
    void renderDashboard(api, view);
  });

  showAnnotate();
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  bootstrap(document.getElementById("app")!);
}
