// Deterministic force-directed layout. Seeded initial placement plus a
// fixed number of relaxation steps keeps node positions reproducible for
// a given model, which the tests rely on.

export interface Point {
  x: number;
  y: number;
}

export interface LayoutOptions {
  width: number;
  height: number;
  iterations?: number;
  seed?: number;
}

function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function forceLayout(
  n: number,
  edges: number[][],
  options: LayoutOptions,
): Point[] {
  const { width, height } = options;
  const iterations = options.iterations ?? 200;
  const rand = mulberry32(options.seed ?? 42);
  const cx = width / 2;
  const cy = height / 2;
  const radius = Math.min(width, height) * 0.38;

  const points: Point[] = [];
  for (let i = 0; i < n; i++) {
    const angle = (2 * Math.PI * i) / Math.max(n, 1) + 0.05 * rand();
    points.push({
      x: cx + radius * Math.cos(angle),
      y: cy + radius * Math.sin(angle),
    });
  }
  if (n <= 1) return points;

  const springLength = radius * 0.9;
  const repulsion = radius * radius * 0.45;

  for (let step = 0; step < iterations; step++) {
    const cooling = 1 - step / iterations;
    const force = points.map(() => ({ x: 0, y: 0 }));

    for (let i = 0; i < n; i++) {
      for (let j = i + 1; j < n; j++) {
        const dx = points[i].x - points[j].x;
        const dy = points[i].y - points[j].y;
        const d2 = Math.max(dx * dx + dy * dy, 1e-6);
        const push = repulsion / d2;
        const d = Math.sqrt(d2);
        force[i].x += (dx / d) * push;
        force[i].y += (dy / d) * push;
        force[j].x -= (dx / d) * push;
        force[j].y -= (dy / d) * push;
      }
    }

    for (let i = 0; i < n; i++) {
      for (let j = 0; j < n; j++) {
        if (i === j || edges[i][j] === 0) continue;
        const dx = points[j].x - points[i].x;
        const dy = points[j].y - points[i].y;
        const d = Math.max(Math.sqrt(dx * dx + dy * dy), 1e-3);
        const pull = ((d - springLength) / d) * 0.05;
        force[i].x += dx * pull;
        force[i].y += dy * pull;
        force[j].x -= dx * pull;
        force[j].y -= dy * pull;
      }
    }

    for (let i = 0; i < n; i++) {
      // gentle centering so disconnected nodes do not drift away
      force[i].x += (cx - points[i].x) * 0.01;
      force[i].y += (cy - points[i].y) * 0.01;
      points[i].x += force[i].x * cooling * 0.1;
      points[i].y += force[i].y * cooling * 0.1;
      points[i].x = Math.min(width - 30, Math.max(30, points[i].x));
      points[i].y = Math.min(height - 24, Math.max(24, points[i].y));
    }
  }
  return points;
}
