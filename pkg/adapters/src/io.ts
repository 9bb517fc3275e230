/** File plumbing shared by the adapters: annotation parsing, PNG
 * raster IO, tfjs model load/save against a plain directory, and
 * atomic writes (temp file + rename, so readers never see partials). */

import * as tf from '@tensorflow/tfjs'
import { decode, encode } from 'fast-png'
import { mkdirSync, readFileSync, renameSync, writeFileSync } from 'fs'
import { basename, dirname, join } from 'path'

export interface Box {
  min_r: number
  min_c: number
  max_r: number
  max_c: number
}

export interface AnnotationObject {
  category: string
  bounding_box: Box
}

export interface AnnotationEntry {
  image: string
  width: number
  height: number
  objects: AnnotationObject[]
}

const INFECTED = new Set(['gametocyte', 'ring', 'trophozoite', 'schizont'])

export function isInfected(category: string): boolean {
  return INFECTED.has(category.trim().toLowerCase().replace(/_/g, ' '))
}

export function readAnnotations(path: string): AnnotationEntry[] {
  const doc = JSON.parse(readFileSync(path, 'utf8'))
  if (!Array.isArray(doc)) {
    throw new Error(`${path}: expected a JSON list of image entries`)
  }
  return doc as AnnotationEntry[]
}

export function infectedBoxes(entry: AnnotationEntry): Box[] {
  return entry.objects
    .filter(o => isInfected(o.category))
    .map(o => o.bounding_box)
}

export function atomicWriteSync(path: string, data: Buffer): void {
  const tmp = join(dirname(path), `.${basename(path)}.tmp-${process.pid}`)
  writeFileSync(tmp, data)
  renameSync(tmp, path)
}

export interface GrayPng {
  width: number
  height: number
  depth: number
  data: Uint8Array | Uint16Array
}

export function readPngGray(path: string): GrayPng {
  const img = decode(readFileSync(path))
  if (img.channels !== 1) {
    throw new Error(`${path}: expected a single-channel PNG, got ${img.channels}`)
  }
  return { width: img.width, height: img.height, depth: img.depth, data: img.data as Uint8Array | Uint16Array }
}

export function writeGray16(path: string, data: Uint16Array, width: number, height: number): void {
  atomicWriteSync(path, Buffer.from(encode({ width, height, data, depth: 16, channels: 1 })))
}

export function writeGray8(path: string, data: Uint8Array, width: number, height: number): void {
  atomicWriteSync(path, Buffer.from(encode({ width, height, data, depth: 8, channels: 1 })))
}

export function writeRgb8(path: string, data: Uint8Array, width: number, height: number): void {
  atomicWriteSync(path, Buffer.from(encode({ width, height, data, depth: 8, channels: 3 })))
}

/** Decode an 8-bit RGB(A) PNG into a [1, h, w, 3] float tensor in [0, 1]. */
export function readImageTensor(path: string): { tensor: tf.Tensor4D; width: number; height: number } {
  const img = decode(readFileSync(path))
  if (img.depth !== 8) {
    throw new Error(`${path}: expected an 8-bit image, got depth ${img.depth}`)
  }
  const { width, height, channels } = img
  const src = img.data as Uint8Array
  const rgb = new Float32Array(width * height * 3)
  for (let i = 0; i < width * height; i++) {
    for (let c = 0; c < 3; c++) {
      rgb[i * 3 + c] = src[i * channels + Math.min(c, channels - 1)] / 255
    }
  }
  const tensor = tf.tensor4d(rgb, [1, height, width, 3])
  return { tensor, width, height }
}

export async function loadModelFromDir(dir: string): Promise<tf.LayersModel> {
  return tf.loadLayersModel({
    load: async () => {
      const modelJson = JSON.parse(readFileSync(join(dir, 'model.json'), 'utf8'))
      const weightSpecs: tf.io.WeightsManifestEntry[] = []
      const buffers: Buffer[] = []
      for (const group of modelJson.weightsManifest) {
        weightSpecs.push(...group.weights)
        for (const p of group.paths) buffers.push(readFileSync(join(dir, p)))
      }
      const concat = Buffer.concat(buffers)
      const weightData = concat.buffer.slice(concat.byteOffset, concat.byteOffset + concat.byteLength)
      return {
        modelTopology: modelJson.modelTopology,
        weightSpecs,
        weightData,
        format: modelJson.format,
        generatedBy: modelJson.generatedBy,
        convertedBy: modelJson.convertedBy,
      }
    },
  })
}

export async function saveModelToDir(model: tf.LayersModel, dir: string): Promise<void> {
  mkdirSync(dir, { recursive: true })
  await model.save({
    save: async (artifacts: tf.io.ModelArtifacts) => {
      const raw = artifacts.weightData
      const parts = Array.isArray(raw) ? raw : [raw as ArrayBuffer]
      const weights = Buffer.concat(parts.map(p => Buffer.from(p as ArrayBuffer)))
      atomicWriteSync(join(dir, 'weights.bin'), weights)
      const modelJson = {
        modelTopology: artifacts.modelTopology,
        format: artifacts.format,
        generatedBy: artifacts.generatedBy,
        convertedBy: artifacts.convertedBy,
        weightsManifest: [{ paths: ['weights.bin'], weights: artifacts.weightSpecs }],
      }
      atomicWriteSync(join(dir, 'model.json'), Buffer.from(JSON.stringify(modelJson)))
      return { modelArtifactsInfo: { dateSaved: new Date(), modelTopologyType: 'JSON' as const } }
    },
  })
}

/** One row of the evaluation harness's manifest CSV. */
export interface ManifestRow {
  imageId: string
  annotationPath: string
  saliencyPath: string
  maskPaths: string[]
}

export const MANIFEST_HEADER = 'image_id,annotation_path,saliency_path,mask_paths'

export function writeManifest(rows: ManifestRow[], path: string): void {
  const sorted = [...rows].sort((a, b) => a.imageId.localeCompare(b.imageId))
  const lines = [MANIFEST_HEADER]
  for (const row of sorted) {
    lines.push(`${row.imageId},${row.annotationPath},${row.saliencyPath},${row.maskPaths.join(';')}`)
  }
  atomicWriteSync(path, Buffer.from(lines.join('\n') + '\n'))
}

/** Merge partial rows (e.g. saliency-only and mask-only) by image id. */
export function mergeManifestRows(...groups: ManifestRow[][]): ManifestRow[] {
  const byId = new Map<string, ManifestRow>()
  for (const rows of groups) {
    for (const row of rows) {
      const prev = byId.get(row.imageId)
      if (!prev) {
        byId.set(row.imageId, { ...row, maskPaths: [...row.maskPaths] })
        continue
      }
      if (row.annotationPath) prev.annotationPath = row.annotationPath
      if (row.saliencyPath) prev.saliencyPath = row.saliencyPath
      prev.maskPaths.push(...row.maskPaths)
    }
  }
  return [...byId.values()]
}
