// Software renderer for the smoke isosurface: orbit rotation, an
// orthographic projection, painter's-algorithm depth sort and flat
// shading. Meshes stay in the low thousands of triangles, so a plain
// canvas redraw per interaction is plenty without WebGL. World axes are
// x east, y north, z up; screen y grows downward.

import { meshBounds, type Mesh } from "./obj.js";

export interface Camera {
  yaw: number; // radians about the z axis
  pitch: number; // radians of elevation, 0 looks along the horizon
  scale: number; // screen px per world meter
  target: [number, number, number];
}

export interface ShadedTri {
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  x3: number;
  y3: number;
  depth: number;
  shade: number; // 0..1 flat shading factor
}

export function fitCamera(mesh: Mesh, width: number, height: number, marginPx = 30): Camera {
  const { min, max } = meshBounds(mesh);
  const target: [number, number, number] = [
    (min[0] + max[0]) / 2,
    (min[1] + max[1]) / 2,
    (min[2] + max[2]) / 2,
  ];
  const radius =
    Math.hypot(max[0] - min[0], max[1] - min[1], max[2] - min[2]) / 2 || 1;
  const usable = Math.max(1, Math.min(width, height) / 2 - marginPx);
  return { yaw: Math.PI / 6, pitch: Math.PI / 5, scale: usable / radius, target };
}

// Fixed light in view space, pointing roughly from the upper left
// toward the scene. Faces are shaded double sided so winding order
// never blacks out a surface.
const LIGHT = normalize([-0.4, 0.5, 0.77]);

function normalize(v: [number, number, number]): [number, number, number] {
  const n = Math.hypot(v[0], v[1], v[2]) || 1;
  return [v[0] / n, v[1] / n, v[2] / n];
}

export function projectMesh(mesh: Mesh, cam: Camera, width: number, height: number): ShadedTri[] {
  const cy = Math.cos(cam.yaw);
  const sy = Math.sin(cam.yaw);
  const cp = Math.cos(cam.pitch);
  const sp = Math.sin(cam.pitch);
  const nVerts = mesh.positions.length / 3;

  // View space: vx right, vy up on screen, vz toward the viewer. The
  // camera orbits south of the (yaw-rotated) target, so at pitch 0 east
  // is right and up is up; at pitch pi/2 the view is top down with
  // north up.
  const vx = new Float64Array(nVerts);
  const vy = new Float64Array(nVerts);
  const vz = new Float64Array(nVerts);
  for (let i = 0; i < nVerts; i++) {
    const dx = mesh.positions[3 * i] - cam.target[0];
    const dy = mesh.positions[3 * i + 1] - cam.target[1];
    const dz = mesh.positions[3 * i + 2] - cam.target[2];
    const rx = dx * cy + dy * sy;
    const ry = -dx * sy + dy * cy;
    vx[i] = rx;
    vy[i] = ry * sp + dz * cp;
    vz[i] = -ry * cp + dz * sp;
  }

  const halfW = width / 2;
  const halfH = height / 2;
  const tris: ShadedTri[] = [];
  for (let t = 0; t < mesh.triangles.length; t += 3) {
    const a = mesh.triangles[t];
    const b = mesh.triangles[t + 1];
    const c = mesh.triangles[t + 2];
    const e1: [number, number, number] = [vx[b] - vx[a], vy[b] - vy[a], vz[b] - vz[a]];
    const e2: [number, number, number] = [vx[c] - vx[a], vy[c] - vy[a], vz[c] - vz[a]];
    const normal = normalize([
      e1[1] * e2[2] - e1[2] * e2[1],
      e1[2] * e2[0] - e1[0] * e2[2],
      e1[0] * e2[1] - e1[1] * e2[0],
    ]);
    const lambert = Math.abs(normal[0] * LIGHT[0] + normal[1] * LIGHT[1] + normal[2] * LIGHT[2]);
    tris.push({
      x1: halfW + vx[a] * cam.scale,
      y1: halfH - vy[a] * cam.scale,
      x2: halfW + vx[b] * cam.scale,
      y2: halfH - vy[b] * cam.scale,
      x3: halfW + vx[c] * cam.scale,
      y3: halfH - vy[c] * cam.scale,
      depth: (vz[a] + vz[b] + vz[c]) / 3,
      shade: 0.25 + 0.75 * lambert,
    });
  }
  // Far triangles first so near ones paint over them.
  tris.sort((p, q) => p.depth - q.depth);
  return tris;
}
