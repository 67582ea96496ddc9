/** DOM wiring for the annotation console (single page, no framework).
 *
 * Keyboard: 1..5 assign the five cause labels, c confirms, x rejects,
 * j/k move through the queue.
 */
import { AnnotationApi, Candidate } from "./api.js";
import { CAUSE_LABELS, QueueController, causeForKey } from "./state.js";

const api = new AnnotationApi("");
const controller = new QueueController(api, annotatorName());

function annotatorName(): string {
  const stored = window.localStorage.getItem("annotator");
  if (stored) return stored;
  const name = window.prompt("annotator name?", "annotator") || "annotator";
  window.localStorage.setItem("annotator", name);
  return name;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function render(): void {
  renderBanner();
  renderProgress();
  renderQueue();
  renderDetail();
}

function renderBanner(): void {
  const banner = document.getElementById("banner")!;
  banner.textContent = controller.error ?? "";
  banner.hidden = controller.error === null;
}

function renderProgress(): void {
  const { pending, resolved, rejected } = controller.progress;
  const total = pending + resolved + rejected;
  const bar = document.getElementById("progress-bar")! as HTMLElement;
  const done = total === 0 ? 0 : Math.round(((resolved + rejected) / total) * 100);
  bar.style.width = `${done}%`;
  document.getElementById("progress-text")!.textContent =
    `${pending} pending · ${resolved} resolved · ${rejected} rejected`;
}

function renderQueue(): void {
  const list = document.getElementById("queue")!;
  list.replaceChildren();
  if (controller.allResolved) {
    list.append(el("li", "queue-empty", "all items resolved"));
    return;
  }
  for (const item of controller.items) {
    const row = el("li", item.id === controller.current?.id ? "queue-row active" : "queue-row");
    row.append(el("span", "coords", `LP ${item.lp} · ${item.session}`));
    const reasons = el("span", "reasons");
    for (const reason of item.reasons) reasons.append(el("span", "badge", reason));
    row.append(reasons);
    row.addEventListener("click", () => void controller.open(item.id).then(render));
    list.append(row);
  }
}

function candidateRow(candidate: Candidate): HTMLElement {
  const row = el("button", "candidate");
  row.append(el("span", "candidate-name", candidate.name));
  if (candidate.party) row.append(el("span", "badge party", candidate.party));
  row.append(el("span", "badge gender", candidate.gender));
  row.append(el("span", "badge lps", `LP ${candidate.lps_served.join(", ")}`));
  row.addEventListener("click", () =>
    void controller.submit({ member: candidate.member_id }).then(render),
  );
  return row;
}

function renderDetail(): void {
  const pane = document.getElementById("detail")!;
  pane.replaceChildren();
  const item = controller.current;
  if (!item) return;

  pane.append(el("h2", undefined, `${item.id} (${item.rule}, ${item.date})`));

  if (item.trigger_text) {
    pane.append(el("h3", undefined, "trigger speech"));
    pane.append(el("blockquote", "trigger", item.trigger_text));
  } else {
    pane.append(el("p", "muted", "no transcribed trigger speech"));
  }

  pane.append(el("h3", undefined, "call to order"));
  const sentence = el("blockquote", "cto");
  sentence.append(el("mark", undefined, item.sentence));
  pane.append(sentence);

  if (item.candidates.length > 0) {
    pane.append(el("h3", undefined, "who was called to order?"));
    const candidates = el("div", "candidates");
    for (const candidate of item.candidates) candidates.append(candidateRow(candidate));
    pane.append(candidates);
  }

  pane.append(el("h3", undefined, "cause (keys 1-5)"));
  const causes = el("div", "causes");
  CAUSE_LABELS.forEach((cause, index) => {
    const button = el("button", "cause", `${index + 1} ${cause}`);
    button.addEventListener("click", () => void controller.submit({ cause }).then(render));
    causes.append(button);
  });
  pane.append(causes);

  const actions = el("div", "actions");
  const confirm = el("button", "confirm", "confirm (c)");
  confirm.addEventListener("click", () => void controller.submit({ confirm: true }).then(render));
  const reject = el("button", "reject", "reject false positive (x)");
  reject.addEventListener("click", () => void controller.submit({ reject: true }).then(render));
  actions.append(confirm, reject);
  pane.append(actions);

  if (controller.validation) pane.append(el("p", "validation", controller.validation));
  pane.append(el("p", "muted", `state: ${JSON.stringify(item.state)}`));
}

function moveSelection(offset: number): void {
  const ids = controller.items.map((item) => item.id);
  if (ids.length === 0) return;
  const index = ids.indexOf(controller.current?.id ?? "");
  const next = ids[Math.min(Math.max(index + offset, 0), ids.length - 1)];
  void controller.open(next).then(render);
}

document.addEventListener("keydown", (event) => {
  if (event.target instanceof HTMLInputElement || event.target instanceof HTMLTextAreaElement)
    return;
  const cause = causeForKey(event.key);
  if (cause) {
    void controller.submit({ cause }).then(render);
  } else if (event.key === "x") {
    void controller.submit({ reject: true }).then(render);
  } else if (event.key === "c") {
    void controller.submit({ confirm: true }).then(render);
  } else if (event.key === "j") {
    moveSelection(1);
  } else if (event.key === "k") {
    moveSelection(-1);
  }
});

void controller.refresh().then(render);
