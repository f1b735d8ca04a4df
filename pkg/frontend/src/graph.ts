import { LAYOUT, canvasSize, layeredLayout } from "./layout.js";
import type { GraphSnapshot, Highlights } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

/** SVG rendering of the model graph with highlight and focus support. */
export class GraphView {
  private focused: string | null = null;

  constructor(private svg: SVGSVGElement) {}

  render(snapshot: GraphSnapshot, highlights: Highlights): void {
    const doc = this.svg.ownerDocument;
    while (this.svg.firstChild) this.svg.removeChild(this.svg.firstChild);

    const names = snapshot.nodes.map((n) => n.name);
    const positions = layeredLayout(names, snapshot.edges);
    const { width, height } = canvasSize(positions);
    this.svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
    this.svg.setAttribute("width", String(width));
    this.svg.setAttribute("height", String(height));

    const edgeGroup = doc.createElementNS(SVG_NS, "g");
    edgeGroup.setAttribute("class", "edges");
    for (const edge of snapshot.edges) {
      const from = positions.get(edge.from);
      const to = positions.get(edge.to);
      if (!from || !to) continue;
      const line = doc.createElementNS(SVG_NS, "line");
      line.setAttribute("x1", String(from.x + LAYOUT.NODE_WIDTH));
      line.setAttribute("y1", String(from.y + LAYOUT.NODE_HEIGHT / 2));
      line.setAttribute("x2", String(to.x));
      line.setAttribute("y2", String(to.y + LAYOUT.NODE_HEIGHT / 2));
      line.setAttribute("class", "edge");
      edgeGroup.appendChild(line);
    }
    this.svg.appendChild(edgeGroup);

    const nodeGroup = doc.createElementNS(SVG_NS, "g");
    nodeGroup.setAttribute("class", "nodes");
    for (const node of snapshot.nodes) {
      const pos = positions.get(node.name)!;
      const g = doc.createElementNS(SVG_NS, "g");
      g.setAttribute("data-name", node.name);
      const classes = ["node"];
      if (highlights.seeded.has(node.name)) classes.push("faulty-seeded");
      else if (highlights.derived.has(node.name)) classes.push("faulty-derived");
      if (highlights.spofs.has(node.name)) classes.push("spof");
      if (highlights.onPath.has(node.name)) classes.push("on-path");
      if (highlights.diff.has(node.name)) classes.push("diff-new");
      if (this.focused === node.name) classes.push("focused");
      g.setAttribute("class", classes.join(" "));
      g.setAttribute("transform", `translate(${pos.x},${pos.y})`);

      const rect = doc.createElementNS(SVG_NS, "rect");
      rect.setAttribute("width", String(LAYOUT.NODE_WIDTH));
      rect.setAttribute("height", String(LAYOUT.NODE_HEIGHT));
      rect.setAttribute("rx", "6");
      g.appendChild(rect);

      const label = doc.createElementNS(SVG_NS, "text");
      label.setAttribute("x", String(LAYOUT.NODE_WIDTH / 2));
      label.setAttribute("y", "18");
      label.setAttribute("class", "name");
      let badge = "";
      if (node.start) badge = " [START]";
      if (node.end) badge += " [END]";
      label.textContent = node.name + badge;
      g.appendChild(label);

      if (node.gate) {
        const gateLabel = doc.createElementNS(SVG_NS, "text");
        gateLabel.setAttribute("x", String(LAYOUT.NODE_WIDTH / 2));
        gateLabel.setAttribute("y", "36");
        gateLabel.setAttribute("class", "gate");
        gateLabel.textContent = node.gate;
        g.appendChild(gateLabel);
      }
      nodeGroup.appendChild(g);
    }
    this.svg.appendChild(nodeGroup);
  }

  /** Marks one node focused; safe to call with a stale or unknown name. */
  focus(name: string): void {
    this.focused = name;
    for (const g of Array.from(this.svg.querySelectorAll("g.node"))) {
      g.classList.toggle("focused", g.getAttribute("data-name") === name);
      if (g.getAttribute("data-name") === name) {
        (g as unknown as { scrollIntoView?: (o: object) => void }).scrollIntoView?.({
          block: "nearest",
          inline: "nearest",
        });
      }
    }
  }

  nodeElement(name: string): Element | null {
    return this.svg.querySelector(`g.node[data-name="${name}"]`);
  }
}
