// Schema-driven parameter forms: fields come straight from the gateway's
// published param schemas; validation runs before submission so schema
// errors surface inline instead of as a failed request.

import type { ParamSchema } from './types.js'

export interface FieldModel {
  name: string
  type: string
  required: boolean
  defaultValue: unknown
  choices: string[]
  // how the field is edited: lists and rule lists are JSON-ish text inputs
  widget: 'text' | 'number' | 'select' | 'list' | 'json'
}

export interface FieldError {
  field: string
  message: string
}

export function fieldModels(params: ParamSchema[]): FieldModel[] {
  return params.map((p) => ({
    name: p.name,
    type: p.type,
    required: p.required,
    defaultValue: p.default,
    choices: p.choices ?? [],
    widget:
      p.type === 'int' || p.type === 'float'
        ? 'number'
        : p.type === 'enum'
          ? 'select'
          : p.type === 'string_list' || p.type === 'artifact_list'
            ? 'list'
            : p.type === 'rule_list'
              ? 'json'
              : 'text',
  }))
}

/** Turn raw form strings into typed params; empty optional fields are omitted. */
export function collectParams(
  fields: FieldModel[],
  raw: Record<string, string>,
): { params: Record<string, unknown>; errors: FieldError[] } {
  const params: Record<string, unknown> = {}
  const errors: FieldError[] = []
  for (const field of fields) {
    const text = (raw[field.name] ?? '').trim()
    if (text === '') {
      if (field.required) errors.push({ field: field.name, message: 'required' })
      continue
    }
    switch (field.widget) {
      case 'number': {
        const value = Number(text)
        if (!Number.isFinite(value)) {
          errors.push({ field: field.name, message: 'must be a number' })
        } else if (field.type === 'int' && !Number.isInteger(value)) {
          errors.push({ field: field.name, message: 'must be an integer' })
        } else {
          params[field.name] = value
        }
        break
      }
      case 'select':
        if (!field.choices.includes(text)) {
          errors.push({
            field: field.name,
            message: `must be one of ${field.choices.join(', ')}`,
          })
        } else {
          params[field.name] = text
        }
        break
      case 'list':
        params[field.name] = text
          .split(/[\n,]/)
          .map((item) => item.trim())
          .filter(Boolean)
        break
      case 'json':
        try {
          params[field.name] = JSON.parse(text)
        } catch {
          errors.push({ field: field.name, message: 'must be valid JSON' })
        }
        break
      default:
        params[field.name] = text
    }
  }
  return { params, errors }
}
