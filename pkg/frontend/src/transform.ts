// One shared page-space <-> screen-space transform for all canvas layers.
// Page pixel space is the single source of coordinates; every layer renders
// through the same zoom/pan, so overlays register with the bitmap exactly.

export interface ViewTransform {
  zoom: number;
  panX: number;
  panY: number;
}

export function identity(): ViewTransform {
  return { zoom: 1, panX: 0, panY: 0 };
}

export function pageToScreen(t: ViewTransform, x: number, y: number): [number, number] {
  return [x * t.zoom + t.panX, y * t.zoom + t.panY];
}

export function screenToPage(t: ViewTransform, sx: number, sy: number): [number, number] {
  return [(sx - t.panX) / t.zoom, (sy - t.panY) / t.zoom];
}

export function rectToScreen(
  t: ViewTransform,
  bbox: [number, number, number, number],
): [number, number, number, number] {
  const [x0, y0] = pageToScreen(t, bbox[0], bbox[1]);
  const [x1, y1] = pageToScreen(t, bbox[2], bbox[3]);
  return [x0, y0, x1, y1];
}

export function zoomAt(t: ViewTransform, sx: number, sy: number, factor: number): ViewTransform {
  const zoom = Math.min(16, Math.max(0.125, t.zoom * factor));
  const [px, py] = screenToPage(t, sx, sy);
  return { zoom, panX: sx - px * zoom, panY: sy - py * zoom };
}

export function pan(t: ViewTransform, dx: number, dy: number): ViewTransform {
  return { zoom: t.zoom, panX: t.panX + dx, panY: t.panY + dy };
}

/** Registration error between an entity's page bbox and its drawn highlight,
 *  in screen pixels; the highlight is drawn through the same transform so the
 *  error is the float rounding of the two mappings. */
export function registrationError(
  t: ViewTransform,
  bbox: [number, number, number, number],
): number {
  const direct = rectToScreen(t, bbox);
  const roundTrip = rectToScreen(t, [
    ...screenToPage(t, direct[0], direct[1]),
    ...screenToPage(t, direct[2], direct[3]),
  ] as [number, number, number, number]);
  let worst = 0;
  for (let i = 0; i < 4; i++) {
    worst = Math.max(worst, Math.abs(direct[i] - roundTrip[i]));
  }
  return worst;
}
