// Page wiring.  The password is read from the form, the field is
// cleared immediately after key derivation kicks off, and the derived
// secret stays inside this tab: requests carry only public values.

import { ApiClient, ServerError } from "./api.js";
import { loginFlow, registerFlow, RoundEvent } from "./flows.js";
import { cryptoParitySuite, GoldenVectors } from "./parity.js";

const api = new ApiClient("");

const loginInput = document.getElementById("login") as HTMLInputElement;
const passwordInput = document.getElementById("password") as HTMLInputElement;
const registerButton = document.getElementById("register-btn") as HTMLButtonElement;
const signinButton = document.getElementById("signin-btn") as HTMLButtonElement;
const phaseLine = document.getElementById("phase") as HTMLDivElement;
const roundLog = document.getElementById("round-log") as HTMLOListElement;
const tokenBox = document.getElementById("token-box") as HTMLDivElement;
const compactToggle = document.getElementById("compact") as HTMLInputElement;
const selftestButton = document.getElementById("selftest-btn") as HTMLButtonElement;
const selftestOut = document.getElementById("selftest-out") as HTMLDivElement;

const GRAPH_SIZE = 128;

function setPhase(text: string, tone: "info" | "ok" | "bad" = "info") {
  phaseLine.textContent = text;
  phaseLine.dataset.tone = tone;
}

function logLine(text: string) {
  const item = document.createElement("li");
  item.textContent = text;
  roundLog.appendChild(item);
}

function resetView() {
  roundLog.replaceChildren();
  tokenBox.textContent = "";
  tokenBox.hidden = true;
}

function takeCredentials(): { login: string; password: string } | null {
  const login = loginInput.value.trim();
  const password = passwordInput.value;
  if (!login || !password) {
    setPhase("login and password are both required", "bad");
    return null;
  }
  // drop the password from the form before any async work starts
  passwordInput.value = "";
  return { login, password };
}

function setBusy(busy: boolean) {
  registerButton.disabled = busy;
  signinButton.disabled = busy;
}

function describeError(error: unknown): { text: string; tone: "bad" } {
  if (error instanceof ServerError) {
    switch (error.errorCode) {
      case "locked": {
        const minutes = error.retryAfterMs ? Math.ceil(error.retryAfterMs / 60000) : null;
        return { text: `account locked${minutes ? `, retry in ~${minutes} min` : ""}`, tone: "bad" };
      }
      case "expired":
        return { text: "session expired on the server; submit again to restart", tone: "bad" };
      case "conflict":
        return { text: "this login is already registered with different keys", tone: "bad" };
      case "unknown_or_failed":
        return { text: "authentication failed", tone: "bad" };
      default:
        return { text: `${error.errorCode}: ${error.message}`, tone: "bad" };
    }
  }
  return { text: `network problem: ${String(error)}`, tone: "bad" };
}

registerButton.addEventListener("click", async () => {
  const credentials = takeCredentials();
  if (!credentials) return;
  resetView();
  setBusy(true);
  setPhase("deriving keys in this browser…");
  try {
    await registerFlow(api, credentials.login, credentials.password, GRAPH_SIZE);
    setPhase(`registered '${credentials.login}' — only the two public graphs went to the server`, "ok");
  } catch (error) {
    setPhase(describeError(error).text, "bad");
  } finally {
    setBusy(false);
  }
});

signinButton.addEventListener("click", async () => {
  const credentials = takeCredentials();
  if (!credentials) return;
  resetView();
  setBusy(true);
  setPhase("deriving keys in this browser…");
  const onEvent = (event: RoundEvent) => {
    if (compactToggle.checked) return;
    switch (event.kind) {
      case "derived":
        logLine(`derived secret and public pair at n=${event.n}`);
        break;
      case "session":
        logLine(`session opened: ${event.roundsTotal} rounds`);
        break;
      case "commit":
        logLine(`round ${event.round}: sent commitment H`);
        break;
      case "challenge":
        logLine(`round ${event.round}: challenged with b=${event.b}`);
        break;
      case "response":
        logLine(`round ${event.round}: sent response χ`);
        break;
      case "round_pass":
        logLine(`round ${event.round}: verified ✓`);
        break;
    }
    if (event.kind === "commit" || event.kind === "challenge" || event.kind === "response") {
      setPhase(`proving… round ${event.round}`);
    }
  };
  try {
    const result = await loginFlow(api, credentials.login, credentials.password, onEvent);
    if (result.accepted) {
      setPhase(`accepted after ${result.roundsCompleted} rounds`, "ok");
      tokenBox.hidden = false;
      tokenBox.textContent = `token: ${result.token}`;
    } else {
      const reason = result.errorCode === "unknown_or_failed" ? "authentication failed" : result.errorCode;
      setPhase(`rejected at round ${result.roundsCompleted + 1} (${reason})`, "bad");
    }
  } catch (error) {
    setPhase(describeError(error).text, "bad");
  } finally {
    setBusy(false);
  }
});

selftestButton.addEventListener("click", async () => {
  selftestOut.textContent = "running parity suite…";
  try {
    const response = await fetch("dist/kdf_golden.json");
    const vectors = (await response.json()) as GoldenVectors;
    const report = await cryptoParitySuite(vectors);
    selftestOut.textContent = report.pass
      ? `parity suite: ${report.checks} checks, all byte-identical`
      : `parity suite FAILED: ${report.failures.join("; ")}`;
  } catch (error) {
    selftestOut.textContent = `could not run parity suite: ${String(error)}`;
  }
});
