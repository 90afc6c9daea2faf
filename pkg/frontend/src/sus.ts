// Usability questionnaire form: ten Likert statements plus respondent
// background.  Submission stays disabled until every statement has an
// answer; the respondent never sees their own score.

import {
  ACADEMIC_PROGRAMS,
  ApiClient,
  ApiError,
  COMPLETED_COURSES,
  SURVEY_MODES,
  SusResponsePayload,
} from "./api.js";
import { button, clear, el, errorBanner } from "./dom.js";

const SCALE_ENDS = ["strongly disagree", "strongly agree"];

interface SelectSpec {
  name: string;
  label: string;
  options: readonly string[];
}

const BACKGROUND_SELECTS: SelectSpec[] = [
  { name: "mode", label: "Mode just used", options: SURVEY_MODES },
  { name: "academic_program", label: "Academic program", options: ACADEMIC_PROGRAMS },
  { name: "first_course", label: "Is this your first programming course?", options: ["yes", "no"] },
  { name: "completed_courses", label: "Programming courses completed", options: COMPLETED_COURSES },
  { name: "experience", label: "Programming experience (1–5)", options: ["1", "2", "3", "4", "5"] },
  { name: "comfort", label: "Comfort with programming (1–5)", options: ["1", "2", "3", "4", "5"] },
  { name: "attitude", label: "Attitude toward programming (1–5)", options: ["1", "2", "3", "4", "5"] },
  { name: "course_attitude", label: "Reaction to programming courses (1–5)", options: ["1", "2", "3", "4", "5"] },
  { name: "used_internet", label: "Used internet resources to learn?", options: ["yes", "no"] },
];

export class SusForm {
  private readonly banner = errorBanner();
  private readonly validation = el("div", "form-validation");
  private submitButton: HTMLButtonElement;
  private form: HTMLElement;
  private resourcesInput: HTMLInputElement;
  private tagInput: HTMLInputElement;
  private itemCount = 0;
  private tail: Promise<void> = Promise.resolve();

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
  ) {
    clear(root);
    root.appendChild(el("h2", undefined, "Usability questionnaire"));
    root.appendChild(this.banner.banner);
    this.form = el("div", "sus-form");
    root.appendChild(this.form);
    this.submitButton = button("Submit Response", "sus-submit", () => this.submit());
    this.submitButton.disabled = true;
    this.resourcesInput = el("input", "sus-resources");
    this.tagInput = el("input", "sus-tag");
  }

  settle(): Promise<void> {
    return this.tail;
  }

  start(): void {
    this.tail = this.tail
      .then(async () => {
        const items = await this.api.questionnaire();
        this.build(items);
      })
      .catch((err) => {
        this.banner.show(err instanceof ApiError
          ? `${err.code}: ${err.message}`
          : String(err));
      });
  }

  private build(items: string[]): void {
    clear(this.form);
    this.itemCount = items.length;

    const statements = el("div", "sus-items");
    items.forEach((text, index) => {
      const n = index + 1;
      const row = el("div", "sus-item");
      row.dataset.item = String(n);
      row.appendChild(el("div", "sus-item-text", `${n}. ${text}`));
      const scale = el("div", "sus-scale");
      scale.appendChild(el("span", "scale-end", SCALE_ENDS[0]));
      for (let value = 1; value <= 5; value += 1) {
        const label = el("label", "scale-choice");
        const radio = el("input");
        radio.type = "radio";
        radio.name = `item-${n}`;
        radio.value = String(value);
        label.appendChild(radio);
        label.appendChild(el("span", undefined, String(value)));
        scale.appendChild(label);
      }
      scale.appendChild(el("span", "scale-end", SCALE_ENDS[1]));
      row.appendChild(scale);
      statements.appendChild(row);
    });
    this.form.appendChild(statements);

    const background = el("div", "sus-background");
    for (const spec of BACKGROUND_SELECTS) {
      const row = el("label", "background-field");
      row.appendChild(el("span", undefined, spec.label));
      const select = el("select");
      select.name = spec.name;
      const placeholder = el("option", undefined, "choose…");
      placeholder.value = "";
      placeholder.disabled = true;
      placeholder.selected = true;
      select.appendChild(placeholder);
      for (const value of spec.options) {
        const option = el("option", undefined, value);
        option.value = value;
        select.appendChild(option);
      }
      row.appendChild(select);
      background.appendChild(row);
    }

    const resources = el("label", "background-field");
    resources.appendChild(el("span", undefined,
      "Resources used (comma-separated, optional)"));
    this.resourcesInput.type = "text";
    resources.appendChild(this.resourcesInput);
    background.appendChild(resources);

    const tag = el("label", "background-field");
    tag.appendChild(el("span", undefined, "Respondent tag (optional)"));
    this.tagInput.type = "text";
    tag.appendChild(this.tagInput);
    background.appendChild(tag);
    this.form.appendChild(background);

    this.form.appendChild(this.validation);
    this.form.appendChild(this.submitButton);
    this.form.addEventListener("change", () => this.updateSubmitState());
    this.updateSubmitState();
  }

  private itemValue(n: number): number | null {
    const checked = this.form.querySelector<HTMLInputElement>(
      `input[name="item-${n}"]:checked`);
    return checked === null ? null : Number(checked.value);
  }

  private selectValue(name: string): string {
    const select = this.form.querySelector<HTMLSelectElement>(
      `select[name="${name}"]`);
    return select?.value ?? "";
  }

  private missingParts(): string[] {
    const missing: string[] = [];
    const unanswered: number[] = [];
    for (let n = 1; n <= this.itemCount; n += 1) {
      if (this.itemValue(n) === null) unanswered.push(n);
    }
    if (unanswered.length) {
      missing.push(`statements ${unanswered.join(", ")} need an answer`);
    }
    for (const spec of BACKGROUND_SELECTS) {
      if (this.selectValue(spec.name) === "") {
        missing.push(`${spec.label} is required`);
      }
    }
    return missing;
  }

  private updateSubmitState(): void {
    const missing = this.missingParts();
    this.submitButton.disabled = missing.length > 0;
    this.validation.textContent = missing.length ? missing.join("; ") : "";
  }

  private collect(): SusResponsePayload {
    const items: number[] = [];
    for (let n = 1; n <= this.itemCount; n += 1) {
      items.push(this.itemValue(n) ?? 0);
    }
    const resources = this.resourcesInput.value
      .split(",")
      .map((part) => part.trim())
      .filter((part) => part !== "");
    const payload: SusResponsePayload = {
      items,
      mode: this.selectValue("mode") as SusResponsePayload["mode"],
      respondent: {
        academic_program: this.selectValue("academic_program"),
        first_course: this.selectValue("first_course") === "yes",
        completed_courses: this.selectValue("completed_courses"),
        experience: Number(this.selectValue("experience")),
        comfort: Number(this.selectValue("comfort")),
        attitude: Number(this.selectValue("attitude")),
        course_attitude: Number(this.selectValue("course_attitude")),
        used_internet: this.selectValue("used_internet") === "yes",
        resources,
      },
    };
    const tag = this.tagInput.value.trim();
    if (tag !== "") payload.tag = tag;
    return payload;
  }

  submit(): void {
    this.tail = this.tail
      .then(async () => {
        if (this.missingParts().length) return;
        this.banner.hide();
        // the computed score is deliberately not shown to the respondent
        await this.api.submitSusResponse(this.collect());
        clear(this.form);
        this.form.appendChild(el("div", "sus-thanks",
          "Response recorded — thank you."));
      })
      .catch((err) => {
        this.banner.show(err instanceof ApiError
          ? `${err.code}: ${err.message}`
          : String(err));
      });
  }
}
