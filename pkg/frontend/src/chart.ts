// Time-series chart model: recorder samples to an auto-scaled polyline.
// All values arrive from server frames; nothing is computed client-side.

export interface ChartLayout {
  width: number;
  height: number;
  padding: number;
}

export interface ChartScale {
  tMin: number;
  tMax: number;
  vMin: number;
  vMax: number;
}

export function scaleOf(samples: [number, number][], pad = 0.05): ChartScale | null {
  if (samples.length === 0) {
    return null;
  }
  let tMin = samples[0][0];
  let tMax = samples[0][0];
  let vMin = samples[0][1];
  let vMax = samples[0][1];
  for (const [t, v] of samples) {
    tMin = Math.min(tMin, t);
    tMax = Math.max(tMax, t);
    vMin = Math.min(vMin, v);
    vMax = Math.max(vMax, v);
  }
  if (tMax === tMin) {
    tMax = tMin + 1e-9;
  }
  const span = vMax - vMin || 1e-9;
  return { tMin, tMax, vMin: vMin - span * pad, vMax: vMax + span * pad };
}

export function toPolyline(
  samples: [number, number][],
  layout: ChartLayout,
  scale: ChartScale,
): [number, number][] {
  const innerW = layout.width - 2 * layout.padding;
  const innerH = layout.height - 2 * layout.padding;
  return samples.map(([t, v]) => [
    layout.padding + ((t - scale.tMin) / (scale.tMax - scale.tMin)) * innerW,
    layout.padding + (1 - (v - scale.vMin) / (scale.vMax - scale.vMin)) * innerH,
  ]);
}

/** Nearest sample to a hover x-position, for the (t, value) readout. */
export function hoverSample(
  samples: [number, number][],
  layout: ChartLayout,
  scale: ChartScale,
  screenX: number,
): [number, number] | null {
  if (samples.length === 0) {
    return null;
  }
  const innerW = layout.width - 2 * layout.padding;
  const t = scale.tMin + ((screenX - layout.padding) / innerW) * (scale.tMax - scale.tMin);
  let best = samples[0];
  for (const s of samples) {
    if (Math.abs(s[0] - t) < Math.abs(best[0] - t)) {
      best = s;
    }
  }
  return best;
}

/** Ring-buffer view: appending beyond the window slides the x-axis without
 *  gaps (the server already evicts; this just keeps the latest n). */
export function windowed(samples: [number, number][], n: number): [number, number][] {
  return samples.length <= n ? samples : samples.slice(samples.length - n);
}
