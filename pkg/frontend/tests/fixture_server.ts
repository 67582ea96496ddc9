/** In-memory fixture API server implementing the documented wire contract.
 *
 * Mirrors the backend's queue semantics: items leave the queue when every
 * reason is addressed, a rejection never carries a cause, unknown items are
 * 404 and invariant violations are 422 with a named detail.
 */
import type { FetchLike, ItemDetail, Progress } from "../src/api.js";

const CAUSES = ["ITO", "GI", "NV", "NDV", "MISC"];

interface StoredItem {
  detail: ItemDetail;
  needsPerson: boolean;
}

export class FixtureServer {
  items = new Map<string, StoredItem>();
  rejected = new Set<string>();
  resolved = new Set<string>();
  requests: string[] = [];
  failAll = false;

  constructor() {
    const base = {
      lp: 5,
      session: 20,
      date: "1966-11-30",
      rule: "rule2",
      candidates: [
        {
          member_id: "m001",
          name: "Herbert Wehner",
          party: "SPD",
          gender: "male",
          lps_served: [5, 6, 7],
        },
      ],
      state: { cause: null, resolved_member: null, status: "auto" },
      trigger_text: "Das ist eine Zumutung!",
    };
    this.add({
      ...base,
      id: "5-20-2-1",
      sentence: "Ich rufe den Abgeordneten Wehner zur Ordnung.",
      reasons: ["needs_cause"],
    });
    this.add({
      ...base,
      id: "7-40-0-1",
      sentence: "Ich rufe Sie zur Ordnung.",
      reasons: ["needs_cause", "needs_person"],
      trigger_text: null,
      candidates: [],
    });
    this.add({
      ...base,
      id: "11-60-2-1",
      sentence: "Ich kann nur wegen der Zwischenrufe zur Ordnung rufen, die ich selber höre.",
      reasons: ["needs_cause", "needs_person"],
    });
  }

  add(detail: ItemDetail): void {
    this.items.set(detail.id, {
      detail,
      needsPerson: detail.reasons.includes("needs_person"),
    });
  }

  progress(): Progress {
    let pending = 0;
    for (const [id] of this.items) if (this.isPending(id)) pending += 1;
    return { pending, resolved: this.resolved.size, rejected: this.rejected.size };
  }

  private isPending(id: string): boolean {
    return this.items.has(id) && !this.rejected.has(id) && !this.resolved.has(id);
  }

  private reasonsOf(stored: StoredItem): string[] {
    const reasons: string[] = [];
    if (stored.detail.state.cause === null) reasons.push("needs_cause");
    if (stored.needsPerson && stored.detail.state.resolved_member === null)
      reasons.push("needs_person");
    return reasons;
  }

  /** FetchLike implementation handed to the client under test. */
  fetch: FetchLike = async (input, init) => {
    this.requests.push(`${init?.method ?? "GET"} ${input}`);
    if (this.failAll) return json(500, { detail: "internal error" });

    const url = String(input);
    if (url.endsWith("/api/queue")) {
      const queue = [...this.items.entries()]
        .filter(([id]) => this.isPending(id))
        .map(([, stored]) => ({ ...stored.detail, reasons: this.reasonsOf(stored) }));
      return json(200, queue);
    }
    if (url.endsWith("/api/progress")) return json(200, this.progress());

    const annotate = url.match(/\/api\/item\/([^/]+)\/annotate$/);
    if (annotate && init?.method === "POST") {
      const id = decodeURIComponent(annotate[1]);
      if (!this.isPending(id)) return json(404, { detail: `unknown item: ${id}` });
      const body = JSON.parse(String(init.body));
      if (!body.annotator) return json(422, { detail: "missing_annotator" });
      if (!body.cause && !body.resolved_member && !body.status_override)
        return json(422, { detail: "empty_record" });
      if (body.cause && !CAUSES.includes(body.cause))
        return json(422, { detail: `unknown_cause: ${body.cause}` });
      if (body.cause && body.status_override === "rejected")
        return json(422, { detail: "cause_on_rejected" });

      const stored = this.items.get(id)!;
      if (body.status_override === "rejected") {
        this.rejected.add(id);
        stored.detail.state.status = "rejected";
        return json(200, { ok: true, item: null, progress: this.progress() });
      }
      if (body.status_override === "confirmed") stored.detail.state.status = "confirmed";
      if (body.cause) stored.detail.state.cause = body.cause;
      if (body.resolved_member) stored.detail.state.resolved_member = body.resolved_member;

      const reasons = this.reasonsOf(stored);
      if (reasons.length === 0) {
        this.resolved.add(id);
        return json(200, { ok: true, item: null, progress: this.progress() });
      }
      stored.detail.reasons = reasons;
      return json(200, { ok: true, item: stored.detail, progress: this.progress() });
    }

    const item = url.match(/\/api\/item\/([^/]+)$/);
    if (item) {
      const id = decodeURIComponent(item[1]);
      if (!this.isPending(id)) return json(404, { detail: `unknown item: ${id}` });
      const stored = this.items.get(id)!;
      return json(200, { ...stored.detail, reasons: this.reasonsOf(stored) });
    }
    return json(404, { detail: `no route: ${url}` });
  };
}

function json(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}
