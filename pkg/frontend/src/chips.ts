/** Component-name chips extracted from structured chat results. */

/**
 * Every string (or object key) in the result that names a current graph
 * node, in first-appearance order.
 */
export function extractNodeNames(
  value: unknown,
  known: Set<string>,
  found: string[] = []
): string[] {
  if (typeof value === "string") {
    if (known.has(value) && !found.includes(value)) found.push(value);
  } else if (Array.isArray(value)) {
    for (const item of value) extractNodeNames(item, known, found);
  } else if (value && typeof value === "object") {
    for (const [key, sub] of Object.entries(value)) {
      extractNodeNames(key, known, found);
      extractNodeNames(sub, known, found);
    }
  }
  return found;
}

export function renderChips(
  doc: Document,
  names: string[],
  onFocus: (name: string) => void
): HTMLElement {
  const container = doc.createElement("div");
  container.className = "chips";
  for (const name of names) {
    const chip = doc.createElement("button");
    chip.type = "button";
    chip.className = "chip";
    chip.dataset.node = name;
    chip.textContent = name;
    chip.addEventListener("click", () => onFocus(name));
    container.appendChild(chip);
  }
  return container;
}
