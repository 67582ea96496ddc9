/** Queue controller: holds the list, the open item and submission flow.
 *
 * The controller never invents fields: everything shown comes from the API,
 * and a submission is blocked locally unless it carries at least one of
 * cause / member / status override.  A 404 on submit means the item went
 * stale (someone else resolved it): the queue is refreshed silently; a 422
 * surfaces the server's named validation failure.
 */
import { AnnotationApi, ApiError, ItemDetail, Progress, QueueSummary } from "./api.js";

export const CAUSE_LABELS = ["ITO", "GI", "NV", "NDV", "MISC"] as const;
export type CauseLabel = (typeof CAUSE_LABELS)[number];

/** Keyboard mapping: keys 1..5 pick the five cause labels in fixed order. */
export function causeForKey(key: string): CauseLabel | null {
  const index = Number.parseInt(key, 10);
  if (!Number.isInteger(index) || index < 1 || index > CAUSE_LABELS.length) return null;
  return CAUSE_LABELS[index - 1];
}

export interface Submission {
  cause?: CauseLabel;
  member?: string;
  reject?: boolean;
  confirm?: boolean;
  note?: string;
}

export class QueueController {
  items: QueueSummary[] = [];
  progress: Progress = { pending: 0, resolved: 0, rejected: 0 };
  current: ItemDetail | null = null;
  /** Error banner text; null when the UI is healthy. */
  error: string | null = null;
  /** Inline validation message for the open item. */
  validation: string | null = null;

  constructor(
    private readonly api: AnnotationApi,
    readonly annotator: string,
  ) {}

  get allResolved(): boolean {
    return this.error === null && this.items.length === 0;
  }

  async refresh(): Promise<void> {
    try {
      this.items = await this.api.queue();
      this.progress = await this.api.progress();
      this.error = null;
    } catch (err) {
      this.error = describeFailure(err);
      return;
    }
    const openId = this.current?.id;
    const next = this.items.find((item) => item.id === openId) ?? this.items[0];
    await this.open(next?.id ?? null);
  }

  async open(id: string | null): Promise<void> {
    this.validation = null;
    if (id === null) {
      this.current = null;
      return;
    }
    try {
      this.current = await this.api.item(id);
    } catch (err) {
      if (err instanceof ApiError && err.status === 404) {
        // stale reference: drop it and fall back to the head of the queue
        this.items = this.items.filter((item) => item.id !== id);
        this.current = null;
        const head = this.items[0];
        if (head) await this.open(head.id);
        return;
      }
      this.error = describeFailure(err);
    }
  }

  /** Submit one decision for the open item; resolves to true when accepted. */
  async submit(submission: Submission): Promise<boolean> {
    if (!this.current) return false;
    if (!submission.cause && !submission.member && !submission.reject && !submission.confirm) {
      this.validation = "pick a cause, a member, or confirm/reject first";
      return false;
    }
    if (submission.cause && !CAUSE_LABELS.includes(submission.cause)) {
      this.validation = `unknown cause: ${submission.cause}`;
      return false;
    }
    if (submission.reject && submission.cause) {
      this.validation = "a rejected event cannot carry a cause label";
      return false;
    }

    const payload = {
      annotator: this.annotator,
      ...(submission.cause ? { cause: submission.cause } : {}),
      ...(submission.member ? { resolved_member: submission.member } : {}),
      ...(submission.reject
        ? { status_override: "rejected" as const }
        : submission.confirm
          ? { status_override: "confirmed" as const }
          : {}),
      ...(submission.note ? { note: submission.note } : {}),
    };

    try {
      const response = await this.api.annotate(this.current.id, payload);
      this.progress = response.progress;
      this.validation = null;
      if (response.item === null) {
        await this.advance(this.current.id);
      } else {
        this.current = response.item;
      }
      return true;
    } catch (err) {
      if (err instanceof ApiError && err.status === 404) {
        await this.refresh(); // someone else took the item: re-sync
        return false;
      }
      if (err instanceof ApiError && err.status === 422) {
        this.validation = err.message;
        return false;
      }
      this.error = describeFailure(err);
      return false;
    }
  }

  /** Move to the next pending item after `doneId` left the queue. */
  private async advance(doneId: string): Promise<void> {
    const index = this.items.findIndex((item) => item.id === doneId);
    try {
      this.items = await this.api.queue();
    } catch (err) {
      this.error = describeFailure(err);
      return;
    }
    const next = this.items[Math.min(Math.max(index, 0), this.items.length - 1)];
    this.current = null;
    if (next) await this.open(next.id);
  }
}

function describeFailure(err: unknown): string {
  if (err instanceof ApiError) return `annotation API error ${err.status}: ${err.message}`;
  return `annotation API unreachable: ${err instanceof Error ? err.message : String(err)}`;
}
