/** Trial setup form. Validation mirrors the server's parameter invariants
 * so obvious mistakes never leave the browser; the server remains the
 * authority and its 422 messages render inline on the offending fields. */

import type { DesignFormValues } from "../viewmodel.js";
import { validateDesignForm } from "../viewmodel.js";

export interface DesignFormHandle {
  element: HTMLFormElement;
  values(): DesignFormValues;
  showErrors(errors: Map<string, string>): void;
}

const FIELDS: { name: keyof DesignFormValues; label: string; step?: string; value: string }[] = [
  { name: "p_T", label: "Target toxicity p_T", step: "0.01", value: "0.3" },
  { name: "eps1", label: "eps1 (below target)", step: "0.01", value: "0.05" },
  { name: "eps2", label: "eps2 (above target)", step: "0.01", value: "0.05" },
  { name: "xi", label: "Exclusion threshold xi", step: "0.01", value: "0.95" },
  { name: "max_n", label: "Maximum sample size", value: "30" },
  { name: "cohort_size", label: "Cohort size", value: "3" },
  { name: "num_doses", label: "Number of doses", value: "5" },
  { name: "start_dose", label: "Starting dose", value: "1" },
];

export function renderDesignForm(
  container: HTMLElement,
  onSubmit: (values: DesignFormValues) => void,
): DesignFormHandle {
  const form = document.createElement("form");
  form.className = "design-form";

  const variantLabel = document.createElement("label");
  variantLabel.textContent = "Design ";
  const variantSelect = document.createElement("select");
  variantSelect.name = "variant";
  for (const v of ["mtpi2", "mtpi"]) {
    const opt = document.createElement("option");
    opt.value = v;
    opt.textContent = v;
    variantSelect.appendChild(opt);
  }
  variantLabel.appendChild(variantSelect);
  form.appendChild(variantLabel);

  for (const field of FIELDS) {
    const label = document.createElement("label");
    label.textContent = `${field.label} `;
    const input = document.createElement("input");
    input.type = "number";
    input.name = field.name;
    input.value = field.value;
    if (field.step) input.step = field.step;
    const error = document.createElement("span");
    error.className = "field-error";
    error.dataset.for = field.name;
    label.appendChild(input);
    label.appendChild(error);
    form.appendChild(label);
  }

  const submit = document.createElement("button");
  submit.type = "submit";
  submit.textContent = "Start trial";
  form.appendChild(submit);

  const handle: DesignFormHandle = {
    element: form,
    values() {
      const data = new FormData(form);
      const num = (name: string) => Number(data.get(name));
      return {
        p_T: num("p_T"),
        eps1: num("eps1"),
        eps2: num("eps2"),
        xi: num("xi"),
        variant: String(data.get("variant")),
        max_n: num("max_n"),
        cohort_size: num("cohort_size"),
        num_doses: num("num_doses"),
        start_dose: num("start_dose"),
      };
    },
    showErrors(errors) {
      for (const span of form.querySelectorAll<HTMLSpanElement>(".field-error")) {
        span.textContent = errors.get(span.dataset.for ?? "") ?? "";
      }
    },
  };

  form.addEventListener("submit", (ev) => {
    ev.preventDefault();
    const values = handle.values();
    const errors = validateDesignForm(values);
    handle.showErrors(errors);
    if (errors.size === 0) onSubmit(values); // invalid forms never reach the server
  });

  container.appendChild(form);
  return handle;
}
