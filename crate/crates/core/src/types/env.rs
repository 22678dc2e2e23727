use std::collections::{BTreeMap, HashMap};

use super::ty::{EnumId, StructId, Ty};
use crate::runtime::Value;
use crate::syntax::SourceSpan;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldShape {
    Unit,
    Tuple,
    Named,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldsInfo {
    pub shape: FieldShape,
    /// Field names for `Named`, positional indices rendered as text otherwise.
    pub names: Vec<String>,
    pub tys: Vec<Ty>,
}

impl FieldsInfo {
    pub fn unit() -> Self {
        FieldsInfo {
            shape: FieldShape::Unit,
            names: Vec::new(),
            tys: Vec::new(),
        }
    }

    pub fn tuple(tys: Vec<Ty>) -> Self {
        FieldsInfo {
            shape: FieldShape::Tuple,
            names: (0..tys.len()).map(|i| i.to_string()).collect(),
            tys,
        }
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Builtin {
    Option,
    Result,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VariantInfo {
    pub name: String,
    pub fields: FieldsInfo,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnumInfo {
    pub name: String,
    pub variants: Vec<VariantInfo>,
    pub builtin: Option<Builtin>,
}

impl EnumInfo {
    pub fn is_builtin(&self) -> bool {
        self.builtin.is_some()
    }

    pub fn variant_index(&self, name: &str) -> Option<u32> {
        self.variants
            .iter()
            .position(|v| v.name == name)
            .map(|i| i as u32)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StructInfo {
    pub name: String,
    pub fields: FieldsInfo,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstInfo {
    pub ty: Ty,
    pub value: Value,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StaticInfo {
    pub ty: Ty,
    pub init: Value,
    pub mutable: bool,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FnSig {
    pub params: Vec<Ty>,
    pub ret: Ty,
    pub span: SourceSpan,
}

/// Program-wide item table. Built once by the checker, read-only afterwards.
#[derive(Clone, Debug, Default)]
pub struct TypeEnv {
    pub(crate) enums: Vec<EnumInfo>,
    pub(crate) enum_names: HashMap<String, EnumId>,
    pub(crate) structs: Vec<StructInfo>,
    pub(crate) struct_names: HashMap<String, StructId>,
    pub consts: BTreeMap<String, ConstInfo>,
    pub statics: BTreeMap<String, StaticInfo>,
    pub fns: BTreeMap<String, FnSig>,
    /// Widest slice pattern in the program, counted without rest elements.
    /// Slice value spaces track lengths up to twice this explicitly.
    pub slice_width: usize,
}

impl TypeEnv {
    pub fn enum_info(&self, id: EnumId) -> &EnumInfo {
        &self.enums[id.0 as usize]
    }

    pub fn struct_info(&self, id: StructId) -> &StructInfo {
        &self.structs[id.0 as usize]
    }

    pub fn enum_by_name(&self, name: &str) -> Option<EnumId> {
        self.enum_names.get(name).copied()
    }

    pub fn struct_by_name(&self, name: &str) -> Option<StructId> {
        self.struct_names.get(name).copied()
    }

    pub fn enum_ids(&self) -> impl Iterator<Item = EnumId> {
        (0..self.enums.len() as u32).map(EnumId)
    }

    pub(crate) fn add_enum(&mut self, info: EnumInfo) -> EnumId {
        let id = EnumId(self.enums.len() as u32);
        self.enum_names.insert(info.name.clone(), id);
        self.enums.push(info);
        id
    }

    pub(crate) fn add_struct(&mut self, info: StructInfo) -> StructId {
        let id = StructId(self.structs.len() as u32);
        self.struct_names.insert(info.name.clone(), id);
        self.structs.push(info);
        id
    }

    /// `Option<T>`, instantiated on first use.
    pub fn option_of(&mut self, t: Ty) -> EnumId {
        let name = format!("Option<{}>", self.show(&t));
        if let Some(id) = self.enum_by_name(&name) {
            return id;
        }
        self.add_enum(EnumInfo {
            name,
            variants: vec![
                VariantInfo {
                    name: "Some".into(),
                    fields: FieldsInfo::tuple(vec![t]),
                },
                VariantInfo {
                    name: "None".into(),
                    fields: FieldsInfo::unit(),
                },
            ],
            builtin: Some(Builtin::Option),
        })
    }

    /// `Result<T, E>`, instantiated on first use.
    pub fn result_of(&mut self, t: Ty, e: Ty) -> EnumId {
        let name = format!("Result<{}, {}>", self.show(&t), self.show(&e));
        if let Some(id) = self.enum_by_name(&name) {
            return id;
        }
        self.add_enum(EnumInfo {
            name,
            variants: vec![
                VariantInfo {
                    name: "Ok".into(),
                    fields: FieldsInfo::tuple(vec![t]),
                },
                VariantInfo {
                    name: "Err".into(),
                    fields: FieldsInfo::tuple(vec![e]),
                },
            ],
            builtin: Some(Builtin::Result),
        })
    }

    /// Field list of a variant or struct.
    pub fn variant(&self, e: EnumId, v: u32) -> &VariantInfo {
        &self.enum_info(e).variants[v as usize]
    }

    pub fn show(&self, t: &Ty) -> String {
        match t {
            Ty::Bool => "bool".into(),
            Ty::Char => "char".into(),
            Ty::Int(i) => i.name().into(),
            Ty::Str => "str".into(),
            Ty::Enum(e) => self.enum_info(*e).name.clone(),
            Ty::Struct(s) => self.struct_info(*s).name.clone(),
            Ty::Tuple(ts) => {
                let inner: Vec<_> = ts.iter().map(|t| self.show(t)).collect();
                if ts.len() == 1 {
                    format!("({},)", inner[0])
                } else {
                    format!("({})", inner.join(", "))
                }
            }
            Ty::Array(e, n) => format!("[{}; {n}]", self.show(e)),
            Ty::Slice(e) => format!("[{}]", self.show(e)),
            Ty::Ref { mutable, inner } => {
                format!("&{}{}", if *mutable { "mut " } else { "" }, self.show(inner))
            }
            Ty::Never => "!".into(),
        }
    }
}
