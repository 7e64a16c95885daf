import { postRating, type RatingResult } from "./api";

export interface RatingOptions {
  onSaved?: (rating: number) => void;
  /** test seam; defaults to the live API */
  post?: (plotId: string, rating: number) => Promise<RatingResult>;
}

/**
 * Five-point rating widget. A saved rating updates in place; a server
 * rejection surfaces the validation message; a network failure leaves an
 * unsaved indicator with a retry affordance.
 */
export function renderRatingWidget(
  container: HTMLElement,
  plotId: string,
  current: number | null,
  options: RatingOptions = {},
): void {
  container.innerHTML = "";
  const post = options.post ?? postRating;

  const widget = document.createElement("div");
  widget.className = "rating-widget";
  widget.dataset.plotId = plotId;

  const label = document.createElement("span");
  label.className = "rating-label";
  label.textContent = "Usefulness:";
  widget.appendChild(label);

  const status = document.createElement("span");
  status.className = "rating-status";

  const buttons: HTMLButtonElement[] = [];
  const markCurrent = (value: number | null) => {
    for (const b of buttons) {
      b.classList.toggle("is-current", value !== null && Number(b.dataset.value) === value);
    }
  };

  const submit = async (value: number) => {
    status.className = "rating-status";
    status.textContent = "saving…";
    let result: RatingResult;
    try {
      result = await post(plotId, value);
    } catch {
      status.className = "rating-status rating-unsaved";
      status.textContent = "not saved — connection failed";
      const retry = document.createElement("button");
      retry.type = "button";
      retry.className = "rating-retry";
      retry.textContent = "retry";
      retry.addEventListener("click", () => void submit(value));
      status.appendChild(retry);
      return;
    }
    if (result.ok) {
      status.className = "rating-status rating-saved";
      status.textContent = `saved ★${value}`;
      markCurrent(value);
      options.onSaved?.(value);
    } else {
      status.className = "rating-status rating-error";
      status.textContent = result.message ?? "rating rejected";
    }
  };

  for (let value = 1; value <= 5; value += 1) {
    const btn = document.createElement("button");
    btn.type = "button";
    btn.className = "rating-star";
    btn.dataset.value = String(value);
    btn.textContent = String(value);
    btn.addEventListener("click", () => void submit(value));
    buttons.push(btn);
    widget.appendChild(btn);
  }
  markCurrent(current);
  widget.appendChild(status);
  container.appendChild(widget);
}
