// Application bootstrap: config from the query string (?base=...&token=...
// &kind=annotate|triage), keyboard shortcuts, soft timer hint, and
// automatic replay of retained decisions when the browser reconnects.

import { ApiClient } from "./api.js";
import { renderProgress, renderQueueItem, renderRetry, renderStats } from "./dom.js";
import { WorkbenchSession } from "./session.js";
import type { WorkbenchConfig } from "./types.js";

function readConfig(): WorkbenchConfig & { kind: "annotate" | "triage" } {
  const params = new URLSearchParams(window.location.search);
  const baseUrl = params.get("base") ?? localStorage.getItem("vacscreen.base") ?? "";
  const token = params.get("token") ?? localStorage.getItem("vacscreen.token") ?? "";
  const kind = params.get("kind") === "triage" ? "triage" : "annotate";
  localStorage.setItem("vacscreen.base", baseUrl);
  localStorage.setItem("vacscreen.token", token);
  return { baseUrl, token, kind };
}

async function refresh(root: HTMLElement, session: WorkbenchSession): Promise<void> {
  root.textContent = "";
  const item = session.activeItem;
  root.appendChild(renderProgress(session.progress));
  if (item === null) {
    const done = document.createElement("p");
    done.textContent =
      session.pending.size > 0
        ? `Klaar; ${session.pending.size} beslissing(en) wachten op verbinding.`
        : "Wachtrij leeg.";
    root.appendChild(done);
    return;
  }
  root.appendChild(renderQueueItem(item));
  const hint = document.createElement("p");
  hint.className = "timer-hint";
  hint.hidden = true;
  hint.textContent = "Twijfel je langer dan 30 seconden? Kies dan ‘?’.";
  root.appendChild(hint);

  const buttons = document.createElement("div");
  buttons.className = "decisions";
  for (const [label, caption] of [
    ["yes", "ja (y)"],
    ["no", "nee (n)"],
    ["?", "? (?)"],
  ] as const) {
    const button = document.createElement("button");
    button.textContent = caption;
    button.addEventListener("click", () => void decide(label));
    buttons.appendChild(button);
  }
  root.appendChild(buttons);

  const timer = window.setInterval(() => {
    if (session.activeItem !== item) {
      window.clearInterval(timer);
      return;
    }
    hint.hidden = !session.timerHintDue();
  }, 1000);

  async function decide(label: "yes" | "no" | "?"): Promise<void> {
    const outcome = await session.submit(label);
    if (outcome !== "duplicate") {
      await refresh(root, session);
    }
  }
}

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (root === null) return;
  const { baseUrl, token, kind } = readConfig();
  const api = new ApiClient({ baseUrl, token });
  const session = new WorkbenchSession(api, kind);

  const load = async (): Promise<void> => {
    try {
      await session.loadQueue(50);
      await refresh(root, session);
    } catch {
      root.textContent = "";
      root.appendChild(renderRetry(() => void load()));
    }
  };

  window.addEventListener("keydown", (event) => {
    const decision = session.decisionForKey(event.key);
    if (decision !== null && session.activeItem !== null) {
      event.preventDefault();
      void session.submit(decision).then((outcome) => {
        if (outcome !== "duplicate") void refresh(root, session);
      });
    }
  });

  window.addEventListener("online", () => {
    void session.retryPending().then((n) => {
      if (n > 0) void refresh(root, session);
    });
  });

  const dashboard = document.getElementById("dashboard");
  if (dashboard !== null) {
    try {
      const stats = await api.getStats();
      dashboard.appendChild(renderStats(stats.data));
    } catch {
      dashboard.textContent = "Statistieken niet beschikbaar.";
    }
  }

  await load();
}

void boot();
