// Wavefront OBJ reader for the isosurface meshes the service exports.
// Only v and f records matter; everything else is skipped. Faces with
// more than three vertices are fanned into triangles. Indices are
// 1-based and may be negative, counting back from the vertices seen so
// far, per the OBJ convention. Vertex tokens may carry /vt/vn suffixes.

export interface Mesh {
  positions: Float32Array; // xyz triples
  triangles: Uint32Array; // vertex index triples
}

export function vertexCount(mesh: Mesh): number {
  return mesh.positions.length / 3;
}

export function triangleCount(mesh: Mesh): number {
  return mesh.triangles.length / 3;
}

function faceIndex(token: string, nVerts: number, lineNo: number): number {
  const raw = Number.parseInt(token.split("/")[0], 10);
  if (Number.isNaN(raw) || raw === 0) {
    throw new Error(`bad face index "${token}" on line ${lineNo}`);
  }
  const idx = raw > 0 ? raw - 1 : nVerts + raw;
  if (idx < 0 || idx >= nVerts) {
    throw new Error(`face index ${raw} out of range on line ${lineNo}`);
  }
  return idx;
}

export function parseObj(text: string): Mesh {
  const positions: number[] = [];
  const triangles: number[] = [];
  const lines = text.split("\n");
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].trim();
    if (line.startsWith("v ")) {
      const parts = line.split(/\s+/);
      positions.push(Number(parts[1]), Number(parts[2]), Number(parts[3]));
    } else if (line.startsWith("f ")) {
      const tokens = line.split(/\s+/).slice(1);
      if (tokens.length < 3) throw new Error(`face with ${tokens.length} vertices on line ${i + 1}`);
      const nVerts = positions.length / 3;
      const idx = tokens.map((t) => faceIndex(t, nVerts, i + 1));
      for (let k = 1; k + 1 < idx.length; k++) {
        triangles.push(idx[0], idx[k], idx[k + 1]);
      }
    }
  }
  return {
    positions: Float32Array.from(positions),
    triangles: Uint32Array.from(triangles),
  };
}

export interface Bounds {
  min: [number, number, number];
  max: [number, number, number];
}

export function meshBounds(mesh: Mesh): Bounds {
  if (mesh.positions.length === 0) {
    return { min: [0, 0, 0], max: [0, 0, 0] };
  }
  const min: [number, number, number] = [Infinity, Infinity, Infinity];
  const max: [number, number, number] = [-Infinity, -Infinity, -Infinity];
  for (let i = 0; i < mesh.positions.length; i += 3) {
    for (let a = 0; a < 3; a++) {
      const v = mesh.positions[i + a];
      if (v < min[a]) min[a] = v;
      if (v > max[a]) max[a] = v;
    }
  }
  return { min, max };
}
