import { ApiError, ServiceClient } from "./api.js";
import { callLines, decisionHeadline, panelRows } from "./format.js";
import { StatePoller } from "./poll.js";
import type { ChatMessageView, ChatResponseDoc } from "./types.js";

const DEFAULT_SERVICE_URL = "http://127.0.0.1:8400";
const DEFAULT_SIMULATOR_URL = "http://127.0.0.1:8421";

function baseUrls(): { serviceUrl: string; simulatorUrl: string } {
  const params = new URLSearchParams(window.location.search);
  return {
    serviceUrl: params.get("service") ?? DEFAULT_SERVICE_URL,
    simulatorUrl: params.get("simulator") ?? DEFAULT_SIMULATOR_URL,
  };
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className !== undefined) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing element #${id}`);
  return node as T;
}

function renderResponse(response: ChatResponseDoc): HTMLElement {
  const box = el("div", "reply");
  const accepted = response.decision.status === "accepted";
  box.appendChild(
    el("div", accepted ? "headline accepted" : "headline rejected", decisionHeadline(response)),
  );
  if (response.report !== null) {
    const list = el("ul", "calls");
    for (const line of callLines(response.report.results)) {
      list.appendChild(el("li", undefined, line));
    }
    box.appendChild(list);
  }
  return box;
}

function renderMessage(view: ChatMessageView): HTMLElement {
  const item = el("div", `message ${view.direction}`);
  const when = new Date(view.timestamp).toLocaleTimeString();
  item.appendChild(el("div", "meta", `${view.direction === "user" ? "you" : "service"} ${when}`));
  if (view.text !== "") {
    item.appendChild(el("div", "text", view.text));
  }
  if (view.response !== undefined) {
    item.appendChild(renderResponse(view.response));
  }
  return item;
}

function main(): void {
  const { serviceUrl, simulatorUrl } = baseUrls();
  const client = new ServiceClient(serviceUrl, simulatorUrl);

  const log = byId<HTMLDivElement>("chat-log");
  const form = byId<HTMLFormElement>("chat-form");
  const input = byId<HTMLInputElement>("chat-input");
  const sendButton = byId<HTMLButtonElement>("chat-send");
  const banner = byId<HTMLDivElement>("banner");
  const inlineError = byId<HTMLDivElement>("inline-error");
  const panelBody = byId<HTMLTableSectionElement>("panel-body");
  const panelStatus = byId<HTMLSpanElement>("panel-status");

  let pending = false;

  function refreshControls(): void {
    input.disabled = pending;
    sendButton.disabled = pending || input.value.trim() === "";
  }

  function appendMessage(view: ChatMessageView): void {
    log.appendChild(renderMessage(view));
    log.scrollTop = log.scrollHeight;
  }

  function showBanner(text: string): void {
    banner.textContent = text;
    banner.hidden = false;
  }

  function clearErrors(): void {
    banner.hidden = true;
    inlineError.hidden = true;
  }

  async function send(): Promise<void> {
    const text = input.value.trim();
    if (text === "" || pending) return;
    pending = true;
    clearErrors();
    refreshControls();
    appendMessage({ direction: "user", text, timestamp: Date.now() });
    try {
      const response = await client.sendChat(text);
      appendMessage({ direction: "system", text: "", response, timestamp: Date.now() });
      input.value = "";
      void poller.tick();
    } catch (error) {
      if (error instanceof ApiError && error.status < 500) {
        inlineError.textContent = error.message;
        inlineError.hidden = false;
      } else {
        const detail = error instanceof Error ? error.message : String(error);
        showBanner(`message not sent (${detail}), edit and retry`);
      }
    } finally {
      pending = false;
      refreshControls();
    }
  }

  const poller = new StatePoller(
    () => client.getState(),
    (snapshot) => {
      panelStatus.textContent = snapshot.stale ? "stale" : "live";
      panelStatus.className = snapshot.stale ? "stale" : "live";
      if (snapshot.state === null) return;
      panelBody.textContent = "";
      for (const row of panelRows(snapshot.state)) {
        const tr = el("tr");
        tr.appendChild(el("td", undefined, row.label));
        tr.appendChild(el("td", undefined, row.value));
        panelBody.appendChild(tr);
      }
    },
  );

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    void send();
  });
  input.addEventListener("input", refreshControls);

  void client
    .getHealth()
    .then((health) => {
      showBanner(`connected: ${health.exemplars} exemplars, ${health.apis} apis`);
      window.setTimeout(() => {
        banner.hidden = true;
      }, 3000);
    })
    .catch(() => {
      showBanner(`service unreachable at ${serviceUrl}`);
    });

  refreshControls();
  poller.start();
}

main();
